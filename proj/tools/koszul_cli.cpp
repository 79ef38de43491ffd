#include <cstdio>
int main() { std::puts("koszul cli placeholder"); }
