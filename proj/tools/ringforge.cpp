// placeholder CLI; filled in once the solver stack exists
int main() { return 0; }
