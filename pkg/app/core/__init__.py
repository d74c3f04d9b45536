# Settings, exceptions and logging
