# Integration tests
