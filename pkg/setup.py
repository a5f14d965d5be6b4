from setuptools import setup

setup(
    name='repvote',
    version='0.1.0',
    packages=['repvote', 'repvote.tests', 'repvote.elect',
              'repvote.elect.tests', 'repvote.simulate',
              'repvote.simulate.tests', 'repvote.utils'],
    install_requires=['numpy', 'pandas', 'monty'],
    tests_require=['hypothesis'],
    entry_points={'console_scripts': ['repvote = repvote.cli:main']},
    license='MIT',
    author='Repvote Developers',
    description='Monte Carlo comparison of repeat voting (two published, '
                'summed rounds) against single-round elections.'
)
