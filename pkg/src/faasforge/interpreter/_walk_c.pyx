# cython: language_level=3, boundscheck=False, wraparound=False
# Compiled build of the evaluator core; the source of truth is _walk.py.
include "_walk.py"
