import sys
import time
import functools
from datetime import timedelta


class Timeit(object):

    def __init__(self, before_msg=None):
        self.before_message = before_msg

    def __call__(self, method):
        @functools.wraps(method)
        def wrapper(*args, **kwargs):
            message = self.before_message if self.before_message is not None else method.__name__
            # stdout is reserved for result data
            print(message + "...", file=sys.stderr)
            ts = time.time()
            result = method(*args, **kwargs)
            te = time.time()

            elapsed = (te - ts)
            if elapsed < 1:
                print('Elapsed time: %2.2f ms' % (elapsed * 1000), file=sys.stderr)
            else:
                formatted = str(timedelta(seconds=elapsed))
                print('Elapsed time: %s' % formatted, file=sys.stderr)

            return result
        return wrapper
