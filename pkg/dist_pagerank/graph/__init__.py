"""Web graphs, link matrices and the Google matrix action."""
