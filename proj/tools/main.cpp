#include "cli_app.hpp"

int main(int argc, char** argv) { return fscli::run(argc, argv); }
