# The examples/ tree is a read-only reference corpus with its own third-party
# dependencies; it is not part of this package's test suite.
collect_ignore_glob = ["examples/*"]
