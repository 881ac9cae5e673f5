# Models are imported directly where needed
