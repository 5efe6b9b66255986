"""Transit clusters in DAGs: finding, checking, contracting and extending them,
and checking when contraction keeps causal effects identifiable."""
