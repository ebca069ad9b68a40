import setuptools

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setuptools.setup(
    name="squatwatch",
    version="0.0.1",
    description="Domain-squatting detection with embedding search and "
    "validated LLM verdicts",
    long_description=long_description,
    long_description_content_type="text/markdown",
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
    package_dir={"": "src"},
    packages=setuptools.find_packages(where="src"),
    package_data={
        "squatwatch": ["data/*", "data/feedback/*", "testdata/*"],
    },
    python_requires=">=3.8",
    install_requires=[
        "absl-py",
        "dnspython",
        "idna",
        "jax",
        "jaxlib",
        "matplotlib",
        "numpy",
        "requests",
    ],
)
