# Empty file to make fluid_polling.core a package
