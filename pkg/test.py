from pathpart import DecoratedPartialGroup
from pathpart.graphs import Graph

k2 = DecoratedPartialGroup(Graph(2, [(0, 1)], ["a", "b"]), ["Z2", "Z3"])

aut = k2.automorphisms()

print(aut.order, aut.exact_sequence()['text'])
print(k2.recover())
