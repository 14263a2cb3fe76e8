"""Hand data model and configuration loading."""
