#include <stdlib.h>

struct node {
    int payload;
    struct node *next_node;
};

struct node *push_front(struct node *head_node, int payload) {
    struct node *fresh = malloc(sizeof *fresh);
    fresh->payload = payload;
    fresh->next_node = head_node;
    return fresh;
}

int list_length(const struct node *cursor) {
    int steps = 0;
    while (cursor) {
        steps++;
        cursor = cursor->next_node;
    }
    return steps;
}
