#include <cstdio>
int main() { std::puts("fsmpc cli placeholder"); return 0; }
