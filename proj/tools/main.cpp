#include <cstdio>

int main() {
    std::puts("fragdmrg: subcommands not wired yet");
    return 0;
}
