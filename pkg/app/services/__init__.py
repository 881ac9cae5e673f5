# Services layer
