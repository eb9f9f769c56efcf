"""Tests for qboson-sampling."""
