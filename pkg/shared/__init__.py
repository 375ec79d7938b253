# Shared configuration, logging, errors, metrics and schemas
