import numpy
import scipy
import pandas
import tqdm


def get_numpy_info():
    return f'{numpy.__name__} v{numpy.__version__}'


def get_scipy_info():
    return f'{scipy.__name__} v{scipy.__version__}'


def get_pandas_info():
    return f'{pandas.__name__} v{pandas.__version__}'


def get_tqdm_info():
    return f'{tqdm.__name__} v{tqdm.__version__}'


def get_libraries_info():
    return [get_numpy_info(), get_scipy_info(), get_pandas_info(), get_tqdm_info()]
