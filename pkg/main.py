"""
Main entry point for Fluid Polling
"""

if __name__ == "__main__":
    from fluid_polling.cli.commands import app
    app()
