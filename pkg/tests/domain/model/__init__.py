"""Unit tests for `rmtlsize.domain.model` value types (pure, in-memory)."""
