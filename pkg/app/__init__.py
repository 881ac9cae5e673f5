# Hopf-cyclic engine
