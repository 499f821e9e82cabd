// Catch2 v3 amalgamated implementation (provides main()); built once and
// linked into every unit suite.
#include <catch2/catch_amalgamated.cpp>
