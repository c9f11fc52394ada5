"""q-deformed spin chains, Temperley-Lieb calculus and FOEL verification."""
