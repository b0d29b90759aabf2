# Empty file to make fluid_polling.utils a package
