# Empty file to make fluid_polling.cli a package
