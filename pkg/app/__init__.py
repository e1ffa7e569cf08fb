# mcgroupoid application package
