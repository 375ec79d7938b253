# Unit tests
