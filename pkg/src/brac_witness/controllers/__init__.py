# package marker for controllers
