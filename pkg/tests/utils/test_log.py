import logging

from splitfed.utils.log import setup_log, shutdown_log, open_log, log_config
from splitfed.version import version


class TestLog(object):
    def test_file_and_banner(self, tmp_path):
        filename = str(tmp_path / 'test.log')
        log = setup_log('splitfed.test', filename, stream=False)
        log.info('hello')
        shutdown_log('splitfed.test')

        text = open(filename).read()
        assert 'v' + version() in text
        assert '[INFO    ]: hello' in text

    def test_no_header(self, tmp_path):
        filename = str(tmp_path / 'test.log')
        log = setup_log('splitfed.test', filename, stream=False, header=False)
        log.info('only line')
        shutdown_log('splitfed.test')
        assert len(open(filename).read().splitlines()) == 1

    def test_debug_level(self, tmp_path):
        filename = str(tmp_path / 'test.log')
        with open_log('splitfed.test', filename, stream=False, header=False) as log:
            log.debug('hidden')
        with open_log('splitfed.test', filename, stream=False, header=False, mode='a', level=logging.DEBUG) as log:
            log.debug('shown')
        text = open(filename).read()
        assert 'hidden' not in text
        assert 'shown' in text

    def test_shutdown(self, tmp_path):
        with open_log('splitfed.test', str(tmp_path / 'test.log'), header=False) as log:
            assert len(log.handlers) == 2
            assert not log.propagate
        assert logging.getLogger('splitfed.test').handlers == []
        assert logging.getLogger('splitfed.test').propagate

    def test_log_config(self, caplog):
        caplog.set_level(logging.INFO, logger='splitfed.test')
        log_config(logging.getLogger('splitfed.test'), {'channel': {'p_loss': 0.5, 'n_lossy_clients': 2},
                                                        'data': {'path': None, 'n': 30}})
        assert '[channel] p_loss=0.5, n_lossy_clients=2' in caplog.text
        assert '[data] n=30' in caplog.text
