# Equilibrium services
