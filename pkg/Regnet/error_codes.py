OK = 0
INPUT_ERROR = 1
NUMERICAL_FAILURE = 2


class RegnetError(Exception):
    exit_code = INPUT_ERROR


class InputError(RegnetError):
    exit_code = INPUT_ERROR


class ParseError(InputError):

    def __init__(self, line_no, message):
        super().__init__(f'line {line_no}: {message}')
        self.line_no = line_no


class DegenerateInputError(InputError):
    pass


class ReportWriteError(InputError):

    def __init__(self, path, cause):
        super().__init__(f'Could not write report to {path}: {cause}')
        self.path = path


class DatasetUnavailableError(InputError):
    pass


class NumericalFailureError(RegnetError):
    exit_code = NUMERICAL_FAILURE

    def __init__(self, iteration, message='non-finite value encountered'):
        super().__init__(f'iteration {iteration}: {message}')
        self.iteration = iteration


def exit_code_for(error):
    if isinstance(error, RegnetError):
        return error.exit_code
    return INPUT_ERROR
