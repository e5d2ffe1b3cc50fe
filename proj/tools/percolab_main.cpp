#include <cstdio>

int main() {
    std::puts("percolab: subcommands pending");
    return 1;
}
