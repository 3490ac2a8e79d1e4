from setuptools import setup
from tools.configuration import Configuration

with open("README.md", "r") as fh:
    long_description = fh.read()

with open('requirements.txt', "r") as req_file:
    requirements = req_file.read().splitlines()

# 'fockstat' alone is too generic a distribution name
setup(name='fockstat-app',
      version=Configuration.get_release_data_info()['develop_version'],
      description='Linear-optics toolkit: boson sampling distributions and interferometric phase sensitivity.',
      keywords='boson sampling permanent linear optics quantum metrology interferometer',
      license='GPLv3',
      long_description=long_description,
      long_description_content_type="text/markdown",
      classifiers=[
          "Development Status :: 3 - Alpha",
          "Environment :: Console",
          "Intended Audience :: Science/Research",
          "Intended Audience :: Education",
          "Programming Language :: Python :: 3.8",
          "Programming Language :: Python :: 3.9",
          "Programming Language :: Python :: 3.10",
          "License :: OSI Approved :: GNU General Public License v2 or later (GPLv2+)",
          "Topic :: Scientific/Engineering :: Physics",
          "Operating System :: OS Independent",
      ],
      python_requires='>=3.8',
      packages=['analysis', 'tools', 'report'],
      package_data={'tools': ['release_data.json']},
      install_requires=requirements,
      entry_points={"console_scripts": ["fockstat = analysis.fockstat:main"]},
      include_package_data=True,
      zip_safe=False)
