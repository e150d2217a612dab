#include <cstdio>

int main() {
    std::puts("sfdma: placeholder");
    return 0;
}
