"""Constants and job configuration."""
