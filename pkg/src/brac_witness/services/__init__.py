# package marker for services
