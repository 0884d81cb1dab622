namespace treent {}
