import dotenv, os, logging
from logging_format import TerminalFormatter, FileFormatter
from datetime import datetime

# Environment variables

dotenv.load_dotenv()
OUTPUT_DIR = os.getenv("CYCLE_BENCH_OUTPUT_DIR", "output")
LOG_LEVEL = os.getenv("CYCLE_BENCH_LOG_LEVEL", "INFO").upper()
DEFAULT_SEED = int(os.getenv("CYCLE_BENCH_SEED", "0"))
STATIC_ORACLE_MAX_N = int(os.getenv("CYCLE_BENCH_STATIC_ORACLE_MAX_N", "256"))

# Constants and Path setup

ID = datetime.now().strftime("%Y-%m-%d_%H-%M-%S")

RUN_DIR = os.path.join(OUTPUT_DIR, ID)
LOGS_PATH = os.path.join(RUN_DIR, "logs.txt")


# Logging setup


def SetupLogging(log_to_file: bool = False) -> logging.Logger:
    """Attach the terminal handler, and the run's log file when asked. Safe to call twice."""
    logger = logging.getLogger()
    logger.setLevel(logging.DEBUG)

    for handler in list(logger.handlers):
        if isinstance(handler.formatter, (TerminalFormatter, FileFormatter)):
            logger.removeHandler(handler)
            handler.close()

    stream = logging.StreamHandler()
    stream.setLevel(LOG_LEVEL)
    stream.setFormatter(TerminalFormatter())
    logger.addHandler(stream)

    if log_to_file:
        os.makedirs(RUN_DIR, exist_ok=True)
        fh = logging.FileHandler(LOGS_PATH, encoding="utf-8")
        fh.setLevel(logging.DEBUG)
        fh.setFormatter(FileFormatter())
        logger.addHandler(fh)
        logging.debug(f"Writing logs to {LOGS_PATH}")

    return logger
