"""Test package for the fine-tuning harness."""
