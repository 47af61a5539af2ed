#include <stdio.h>

/* Sum of the first n elements. */
int sum_array(int *values, int count) {
    int total = 0;
    for (int index = 0; index < count; index++) {
        total += values[index];
    }
    return total;
}

int main(void) {
    int numbers[] = {4, 8, 15, 16, 23, 42};
    printf("%d\n", sum_array(numbers, 6));
    return 0;
}
