package app.model;

public enum Color {
    RED, GREEN, BLUE;

    public Color next() {
        switch (this) {
            case RED:
                return GREEN;
            case GREEN:
                return BLUE;
            default:
                return RED;
        }
    }

    public boolean isWarm() {
        return this == RED;
    }
}
