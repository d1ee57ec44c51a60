"""
Module: Error Management
Purpose: Exception hierarchy, exit-code mapping, per-method failure isolation
Dependencies: functools, time, logging
"""

import functools
import time
import logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


class TrweeError(Exception):
    """Base class for all package errors"""
    exit_code = EXIT_NUMERICAL


class ConfigError(TrweeError, ValueError):
    """Invalid run configuration or command-line usage"""
    exit_code = EXIT_USAGE


class DataError(TrweeError):
    """Input data could not be turned into a Dataset"""
    exit_code = EXIT_DATA


class ParseError(DataError):
    """Unparseable cell in an input file"""

    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        location = []
        if row is not None:
            location.append(f"row {row}")
        if column is not None:
            location.append(f"column '{column}'")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)


class SchemaError(DataError):
    """Required column absent from an input file"""

    def __init__(self, message, column=None):
        self.column = column
        super().__init__(message)


class EstimationError(TrweeError):
    """Base class for numerical failures"""
    exit_code = EXIT_NUMERICAL


class SeparationError(EstimationError):
    """Fitted probabilities pinned to 0 or 1 on positive-weight rows"""


class RankError(EstimationError):
    """Information matrix numerically singular"""


class ConvergenceError(EstimationError):
    """Root-finder hit its iteration limit"""


class SingularJacobianError(EstimationError):
    """Jacobian of an estimating equation numerically singular"""


class EmptyClassError(EstimationError):
    """Binary response constant on the fitting rows"""


class DegenerateArmError(EstimationError):
    """Arm-specific mean is not finite"""


class InsufficientReplicatesError(EstimationError):
    """Too many bootstrap replicates failed"""


class DomainError(EstimationError):
    """Argument outside its mathematical domain"""


class ExcessiveFailureError(EstimationError):
    """Too many simulation replications failed in one cell"""


class ExtremeWeightWarning(UserWarning):
    """Inverse-probability weight above the reporting threshold"""


def exit_code_for(exc):
    """Map an exception to the process exit code"""
    if exc is None:
        return EXIT_OK
    if isinstance(exc, TrweeError):
        return exc.exit_code
    # click usage errors and plain ValueErrors from validation
    if isinstance(exc, ValueError):
        return EXIT_DATA
    return EXIT_NUMERICAL


def handle_exceptions(logger_instance=None):
    """Decorator turning package errors into failure records"""

    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            try:
                return {
                    'success': True,
                    'result': func(*args, **kwargs)
                }
            except TrweeError as e:
                log = logger_instance or logger
                log.error(f"Error in {func.__name__}: {str(e)}")
                return {
                    'success': False,
                    'error': str(e),
                    'error_type': type(e).__name__,
                    'exit_code': e.exit_code,
                    'function': func.__name__
                }

        return wrapper

    return decorator


def log_performance(func):
    """Decorator to log function performance"""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        start_time = time.perf_counter()

        try:
            result = func(*args, **kwargs)
            execution_time = time.perf_counter() - start_time

            if execution_time > 60:
                logger.info(f"Slow execution: {func.__name__} took {execution_time:.1f}s")
            else:
                logger.debug(f"Performance: {func.__name__} took {execution_time:.3f}s")

            return result

        except Exception as e:
            execution_time = time.perf_counter() - start_time
            logger.error(f"Function {func.__name__} failed after {execution_time:.3f}s: {str(e)}")
            raise

    return wrapper


class ErrorCollector:
    """Per-method warnings and failures for one analysis run"""

    def __init__(self):
        self.errors = []
        self.warnings = []

    def add_error(self, message, method=None):
        self.errors.append({'method': method, 'message': str(message)})
        logger.error(f"[{method}] {message}" if method else message)

    def add_warning(self, message, method=None):
        self.warnings.append({'method': method, 'message': str(message)})
        logger.warning(f"[{method}] {message}" if method else message)

    def extend(self, diagnostics, method=None):
        """Record the warning-worthy entries of an estimate's diagnostics"""
        if diagnostics.get('clamped'):
            self.add_warning('probabilities clamped', method)
        if diagnostics.get('extreme_weights'):
            self.add_warning(f"{diagnostics['extreme_weights']} extreme weights", method)
        if diagnostics.get('bayes_converged') is False:
            self.add_warning(f"Bayes fallback not converged after {diagnostics['bayes_rounds']} rounds", method)

    def failed_methods(self):
        return sorted({e['method'] for e in self.errors if e['method']})

    def counts(self):
        return len(self.errors), len(self.warnings)
