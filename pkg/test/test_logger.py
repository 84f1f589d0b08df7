import unittest
import os
import sys

from loguru import logger

# add core/ to the python path
core_path = os.path.join(os.path.dirname(os.path.abspath(__file__)), '..', 'core')
sys.path.append(core_path)
from linac_logger import STAGES, log_stage, stage_message


class TestStageMessages(unittest.TestCase):
    def test_format(self):
        test_cases = [
            (("WEIGHTS", "lambda=[1, 2]", True), "[WEIGHTS] ✓ lambda=[1, 2]"),
            (("VALIDATE", "closed_form: group_law=1.1e+01", False), "[VALIDATE] ✗ closed_form: group_law=1.1e+01"),
            (("FIT", "degree 3"), "[FIT] degree 3"),
        ]
        for args, expected in test_cases:
            with self.subTest(stage=args[0]):
                self.assertEqual(stage_message(*args), expected)

    def test_unknown_stage(self):
        with self.assertRaises(ValueError):
            stage_message("CRAWL", "anything")

    def test_log_stage_reaches_the_named_logger(self):
        captured = []
        handler = logger.add(captured.append, level="DEBUG", format="{message}",
                             filter=lambda record: record["extra"].get("name") == "cstar_linac")
        try:
            log_stage("DOMAIN", "injectivity radius 1", passed=True)
            log_stage("AVERAGE", "node cap 4096 reached", level="WARNING")
        finally:
            logger.remove(handler)
        self.assertEqual([m.strip() for m in captured],
                         ["[DOMAIN] ✓ injectivity radius 1", "[AVERAGE] node cap 4096 reached"])
        self.assertIn("EXTEND", STAGES)


if __name__ == '__main__':
    unittest.main()
