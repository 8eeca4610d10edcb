import logging
import sys


class TerminalFormatter(logging.Formatter):

    grey = "\x1b[38;20m"
    yellow = "\x1b[33;20m"
    red = "\x1b[31;20m"
    bold_red = "\x1b[31;1m"
    green = "\x1b[32;20m"
    reset = "\x1b[0m"
    fmt = "%(asctime)s - %(levelname)s - %(message)s (%(filename)s:%(lineno)d)"

    COLORS = {
        logging.DEBUG: grey,
        logging.INFO: green,
        logging.WARNING: yellow,
        logging.ERROR: red,
        logging.CRITICAL: bold_red,
    }

    def __init__(self, color: bool | None = None) -> None:
        super().__init__(self.fmt)
        # plain text unless stderr is a terminal
        if color is None:
            color = sys.stderr.isatty()
        self._formatters = {
            level: logging.Formatter(code + self.fmt + self.reset if color else self.fmt)
            for level, code in self.COLORS.items()
        }

    def format(self, record):
        formatter = self._formatters.get(record.levelno)
        if formatter is None:
            return super().format(record)
        return formatter.format(record)


class FileFormatter(logging.Formatter):
    # bench sweeps log from worker processes into the same file
    fmt = (
        "%(asctime)s - %(processName)s - %(levelname)s - %(message)s "
        "(%(filename)s:%(lineno)d)"
    )

    def __init__(self) -> None:
        super().__init__(self.fmt)
