import logging

from utils.core import setup_logger


def test_setup_logger_writes_the_run_log_and_leaves_other_loggers_alone(tmp_path):
    root = logging.getLogger()
    saved_handlers, saved_level = root.handlers[:], root.level
    known = {name: lg.level for name, lg in logging.root.manager.loggerDict.items()
             if isinstance(lg, logging.Logger)}
    try:
        logger = setup_logger('debug', tmp_path / 'logs')
        logging.getLogger('estimators.tr').debug('bayes round 1')

        assert logger.name == 'trwee'
        assert root.level == logging.DEBUG
        assert len(root.handlers) == 2
        for handler in root.handlers:
            handler.flush()
        assert 'estimators.tr - DEBUG - bayes round 1' in (tmp_path / 'logs' / 'trwee.log').read_text()

        after = {name: logging.getLogger(name).level for name in known}
        assert after == known
    finally:
        for handler in root.handlers:
            handler.close()
        root.handlers[:] = saved_handlers
        root.setLevel(saved_level)
