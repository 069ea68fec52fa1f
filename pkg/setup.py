from setuptools import setup, find_packages

setup(
   name='Regnet',
   version='1.0',
   description='Low-rank network reconstruction, regularity and regulation',
   author='Leonardo Cascianelli',
   author_email='me.leonardocascianelli@gmail.com',
   packages=find_packages(exclude=['tests']),
   install_requires=[
      'numpy>=1.24',
      'scipy>=1.10',
      'networkx>=3.0',
      'click>=8.0',
      'python-dotenv>=0.19',
      'jsonschema>=4.2',
   ],
   entry_points={
      'console_scripts': ['regnet=Regnet.app:main'],
   },
)
