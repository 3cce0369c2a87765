"""Test suite for the shm-bench generator."""
