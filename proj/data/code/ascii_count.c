#include <ctype.h>
#include <string.h>

// counts letters whose code is below a limit
int count_ascii(const char *message, int limit) {
    int matches = 0;
    size_t length = strlen(message);
    for (size_t position = 0; position < length; position++) {
        if (isalpha(message[position]) && message[position] < limit) {
            matches++;
        }
    }
    return matches;
}
