"""Blocking minimum-cost k-arborescences."""
