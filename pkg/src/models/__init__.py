"""Maps, foliations, lifts and the orbit machinery built on them."""
