package com.example.weather;

import java.io.BufferedReader;
import java.io.IOException;
import java.io.InputStream;
import java.io.InputStreamReader;
import java.net.HttpURLConnection;
import java.net.URL;

final class WeatherClient {
    private static final String BASE = "http://api.weather.example/v1/forecast?q=";
    private static final String DOCS = "see https://weather.example/docs";

    String fetch(String city) throws IOException {
        HttpURLConnection connection = (HttpURLConnection) new URL(BASE + city).openConnection();
        InputStream in = connection.getInputStream();
        StringBuilder body = new StringBuilder();
        int c;
        while ((c = in.read()) != -1) {
            body.append((char) c);
        }
        in.close();
        return body.toString();
    }

    String fetchLines(URL url) throws IOException {
        try (BufferedReader lines = new BufferedReader(new InputStreamReader(url.openStream()))) {
            String first = lines.readLine();
            lines.close();
            return first;
        }
    }
}
