"""Defining sets, critical sets and counting for fixed-margin binary matrices."""
