"""Incremental measurement of one- and two-dimensional structural entropy on dynamic graphs."""
