"""
Tests for logging configuration
"""
import logging
import logging.handlers

from mpdetect.utils.logging_utils import configure_logging, is_debug_mode, log_exception, log_performance


class TestConfigureLogging:

    def teardown_method(self):
        configure_logging(debug=False)

    def test_console_only(self, monkeypatch):
        monkeypatch.delenv('MPDETECT_LOG_FILE', raising=False)
        logger = configure_logging(debug=False)
        assert logger.name == 'mpdetect'
        assert logger.level == logging.INFO
        assert [type(h) for h in logger.handlers] == [logging.StreamHandler]
        assert not is_debug_mode()

    def test_debug_with_file(self, tmp_path):
        log_file = tmp_path / "logs" / "run.log"
        logger = configure_logging(debug=True, log_file=str(log_file))
        assert logger.level == logging.DEBUG
        assert is_debug_mode()
        rotating = [h for h in logger.handlers if isinstance(h, logging.handlers.RotatingFileHandler)]
        assert len(rotating) == 1
        assert rotating[0].maxBytes == 10 * 1024 * 1024
        assert rotating[0].backupCount == 5

        log_performance(logging.getLogger('mpdetect.test'), "sweep", 0.5)
        try:
            raise RuntimeError("boom")
        except RuntimeError as e:
            log_exception(logging.getLogger('mpdetect.test'), e, "Failed:")
        rotating[0].flush()
        text = log_file.read_text()
        assert "Performance: sweep took 0.500 s" in text
        assert "Failed: boom" in text
        assert "Traceback" in text

    def test_environment_log_file(self, tmp_path, monkeypatch):
        log_file = tmp_path / "env.log"
        monkeypatch.setenv('MPDETECT_LOG_FILE', str(log_file))
        logger = configure_logging()
        assert any(isinstance(h, logging.handlers.RotatingFileHandler) for h in logger.handlers)

    def test_reconfigure_replaces_handlers(self, monkeypatch):
        monkeypatch.delenv('MPDETECT_LOG_FILE', raising=False)
        configure_logging()
        logger = configure_logging()
        assert len(logger.handlers) == 1
