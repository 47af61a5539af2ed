#define MAX_ROWS 8

void transpose_matrix(int grid[MAX_ROWS][MAX_ROWS], int order) {
    for (int row = 0; row < order; row++) {
        for (int column = row + 1; column < order; column++) {
            int saved = grid[row][column];
            grid[row][column] = grid[column][row];
            grid[column][row] = saved;
        }
    }
}
