"""Boolean functional synthesis: Skolem functions for exists Y. F(X, Y)."""
