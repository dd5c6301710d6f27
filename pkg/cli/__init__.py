"""Command-line interface for the interval bounds analyzer."""
